fn main() -> std::process::ExitCode {
    splitvi::cli::main()
}

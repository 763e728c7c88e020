fn main() -> std::process::ExitCode {
    datatrace::cli::main()
}

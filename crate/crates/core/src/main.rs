fn main() -> std::process::ExitCode {
    ordlevel::cli::main()
}

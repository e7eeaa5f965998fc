fn main() -> std::process::ExitCode {
    adfam::cli::main()
}

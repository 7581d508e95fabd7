fn main() -> std::process::ExitCode {
    bugoracle::cli::main()
}

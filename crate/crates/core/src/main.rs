fn main() -> std::process::ExitCode {
    persuasion_corpus::cli::main()
}

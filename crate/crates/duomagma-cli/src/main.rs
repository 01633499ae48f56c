fn main() {
    std::process::exit(duomagma_cli::run());
}

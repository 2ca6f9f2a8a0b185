fn main() {
    std::process::exit(g2toolkit_cli::run(std::env::args()));
}

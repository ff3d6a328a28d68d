fn main() {
    std::process::exit(limitband::cli::run(std::env::args()));
}

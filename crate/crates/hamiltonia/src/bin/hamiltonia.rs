fn main() {
    std::process::exit(hamiltonia::cli::run(std::env::args()));
}

fn main() {
    std::process::exit(jacobi_spectral::cli::run(std::env::args().collect()));
}

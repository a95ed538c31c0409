fn main() {
    std::process::exit(poisson_diffusion::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(z2tower::cli::run(std::env::args_os()));
}

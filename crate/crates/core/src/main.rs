fn main() {
    std::process::exit(gfdim::cli::run(std::env::args_os()));
}

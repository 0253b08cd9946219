fn main() {
    std::process::exit(bigramsey::cli::run(std::env::args_os()));
}

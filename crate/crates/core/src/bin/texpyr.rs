fn main() {
    std::process::exit(texpyr::cli::run(std::env::args_os()));
}

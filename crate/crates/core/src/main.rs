fn main() {
    std::process::exit(distdoubling::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(wavemix_cli::run(std::env::args_os()));
}

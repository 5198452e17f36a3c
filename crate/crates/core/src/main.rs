fn main() {
    std::process::exit(phonovec::cli::run(std::env::args_os()));
}

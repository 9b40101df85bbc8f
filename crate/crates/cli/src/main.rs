fn main() {
    std::process::exit(isetlab_cli::run(std::env::args_os()));
}

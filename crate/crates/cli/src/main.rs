fn main() {
    std::process::exit(qsvlab_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(idrkit_cli::run(std::env::args_os()));
}

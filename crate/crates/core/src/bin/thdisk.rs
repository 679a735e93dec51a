fn main() {
    std::process::exit(thdisk::cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(trackfind::cli::cli_main(std::env::args_os()));
}

fn main() {
    std::process::exit(nematic::cli::cli_main(std::env::args_os()));
}

fn main() {
    std::process::exit(nsai::experiment::cli::cli_main(std::env::args_os()));
}

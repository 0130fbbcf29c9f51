fn main() {
    std::process::exit(eastlab::experiments::cli_run(std::env::args_os()));
}

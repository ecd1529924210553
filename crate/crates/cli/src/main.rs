fn main() {
    std::process::exit(gdl_cli::run(std::env::args_os()));
}

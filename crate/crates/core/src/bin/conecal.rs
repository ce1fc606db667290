fn main() {
    std::process::exit(conecal::cli::run(std::env::args_os()));
}

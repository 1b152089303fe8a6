fn main() {
    std::process::exit(mos_ties::cli::run(std::env::args_os()));
}

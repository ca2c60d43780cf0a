fn main() {
    std::process::exit(privlabel::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(meanlab::cli::run(std::env::args_os()) as i32);
}

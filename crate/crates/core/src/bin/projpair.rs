fn main() {
    std::process::exit(projpair::cli::dispatch(std::env::args_os()));
}

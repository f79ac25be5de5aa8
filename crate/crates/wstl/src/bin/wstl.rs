fn main() {
    std::process::exit(wstl::cli::run_from_env());
}

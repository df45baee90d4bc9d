fn main() {
    std::process::exit(nckp::cli::run());
}

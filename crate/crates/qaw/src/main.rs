fn main() {
    std::process::exit(qaw::cli_main());
}

fn main() {
    std::process::exit(pphi2::cli::main_with_args(std::env::args()));
}

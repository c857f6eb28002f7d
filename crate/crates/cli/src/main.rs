fn main() {
    std::process::exit(graph_purify_cli::run_command(std::env::args_os()));
}

fn main() {
    let code = metaprobe_cli::stub::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}

fn main() {
    // CLI wiring lands with the pipeline module.
}

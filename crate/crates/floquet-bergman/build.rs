fn main() {
    // LAPACK/BLAS provider for ndarray-linalg (built with default-features = false).
    // System OpenBLAS bundles the complex LAPACK drivers (zheev/zgeev/zgesvd).
    println!("cargo:rustc-link-lib=dylib=openblas");
}

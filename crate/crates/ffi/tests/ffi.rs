use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use hyperspline_ffi::*;

fn last_error() -> String {
    let p = hs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn canonicalize_and_convert() {
    let g = hs_group_new();
    let (mut x, mut y) = (0.0, 0.0);
    let mut word = [0u8; 16];
    let mut len = 0usize;
    let st = unsafe { hs_canonicalize(g, 0.1, 0.05, &mut x, &mut y, word.as_mut_ptr(), word.len(), &mut len) };
    assert_eq!(st, HsStatus::Ok);
    assert_eq!(len, 0);
    assert!((x - 0.1).abs() < 1e-15 && (y - 0.05).abs() < 1e-15);

    let st = unsafe { hs_canonicalize(g, 0.95, 0.0, &mut x, &mut y, word.as_mut_ptr(), word.len(), &mut len) };
    assert_eq!(st, HsStatus::Ok);
    assert!(len >= 1);
    assert!(x.hypot(y) < 0.95);

    let st = unsafe { hs_canonicalize(g, 1.0, 0.0, &mut x, &mut y, ptr::null_mut(), 0, ptr::null_mut()) };
    assert_ne!(st, HsStatus::Ok);
    assert!(!last_error().is_empty());
    let st = unsafe { hs_canonicalize(ptr::null(), 0.0, 0.0, &mut x, &mut y, ptr::null_mut(), 0, ptr::null_mut()) };
    assert_eq!(st, HsStatus::NullPointer);

    let st = unsafe { hs_poincare_to_klein(0.5, 0.0, &mut x, &mut y) };
    assert_eq!(st, HsStatus::Ok);
    assert!((x - 0.8).abs() < 1e-15 && y == 0.0);
    unsafe { hs_group_free(g) };
}

#[test]
fn dimension_formula() {
    let mut d = 99usize;
    assert_eq!(unsafe { hs_conformality_dim(2, 2, 0, &mut d) }, HsStatus::Ok);
    assert_eq!(d, 1);
    assert_eq!(unsafe { hs_conformality_dim(3, 2, 1, &mut d) }, HsStatus::Ok);
    assert_eq!(d, 0);
    assert_eq!(unsafe { hs_conformality_dim(1, 2, 0, &mut d) }, HsStatus::InvalidArgument);
    assert!(last_error().contains("two lines"));
}

#[test]
fn basis_lifecycle() {
    let g = hs_group_new();
    let part = unsafe { hs_partition_default(g) };
    assert_eq!(unsafe { hs_partition_cell_count(part) }, 8);
    let mut basis = ptr::null_mut();
    assert_eq!(unsafe { hs_basis_build(g, part, 1, 0, 1e-10, &mut basis) }, HsStatus::Ok);
    let dim = unsafe { hs_basis_dimension(basis) };
    assert!(dim >= 1);
    assert!(unsafe { hs_basis_max_residual(basis) } < 1e-9);

    let mut values = vec![0.0; dim];
    assert_eq!(unsafe { hs_basis_eval(basis, 0.2, -0.1, values.as_mut_ptr(), dim) }, HsStatus::Ok);
    assert_eq!(unsafe { hs_basis_eval(basis, 0.2, -0.1, values.as_mut_ptr(), 0) }, HsStatus::BufferTooSmall);
    assert_eq!(unsafe { hs_basis_eval(basis, 1.5, 0.0, values.as_mut_ptr(), dim) }, HsStatus::InvalidArgument);

    let json = unsafe { hs_basis_to_json(basis) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"dimension\""));
    unsafe { hs_string_free(json) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { hs_basis_build(g, part, 1, -2, 1e-10, &mut bad) }, HsStatus::Validation);
    assert!(bad.is_null());

    unsafe {
        hs_basis_free(basis);
        hs_partition_free(part);
        hs_group_free(g);
    }
}

#[test]
fn partition_from_json() {
    let g = hs_group_new();
    let part = unsafe { hs_partition_default(g) };
    let mut basis = ptr::null_mut();
    assert_eq!(unsafe { hs_basis_build(g, part, 0, 0, 1e-10, &mut basis) }, HsStatus::Ok);
    let json = unsafe { hs_basis_to_json(basis) };
    let doc: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    let text = CString::new(doc["partition"].to_string()).unwrap();
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { hs_partition_from_json(g, text.as_ptr(), &mut loaded) }, HsStatus::Ok);
    assert_eq!(unsafe { hs_partition_cell_count(loaded) }, 8);

    let broken = CString::new("{\"vertices\": [[0, 0]]}").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { hs_partition_from_json(g, broken.as_ptr(), &mut none) }, HsStatus::Validation);
    unsafe {
        hs_string_free(json);
        hs_basis_free(basis);
        hs_partition_free(loaded);
        hs_partition_free(part);
        hs_group_free(g);
    }
}

#[test]
fn header_declares_api_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/hyperspline.h")).unwrap();
    for name in ["hs_group_new", "hs_canonicalize", "hs_basis_build", "hs_basis_eval", "hs_last_error", "HS_STATUS_OK"] {
        assert!(header.contains(name), "{name} missing");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"hyperspline.h\"\nint main(void) { HsGroup *g = hs_group_new(); hs_group_free(g); return HS_STATUS_OK; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I"]).arg(format!("{dir}/include")).arg(&src).output() else {
        eprintln!("no C compiler found; header syntax not checked");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rmae_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rmae_last_error()) }.to_string_lossy().into_owned()
}

fn constraint(r: usize, n: usize, weights: &[usize], full: bool) -> *mut RmaeConstraint {
    let mut c = ptr::null_mut();
    let st = unsafe { rmae_constraint_new(r, n, weights.as_ptr(), weights.len(), full, &mut c) };
    assert_eq!(st, RmaeStatus::Ok, "{}", last_error());
    c
}

#[test]
fn constraint_lifecycle() {
    let c = constraint(3, 7, &[], true);
    unsafe {
        assert_eq!(rmae_constraint_length(c), 128);
        assert_eq!(rmae_constraint_dimension(c), 64);
        assert_eq!(rmae_constraint_dynamic_count(c), 22);
        rmae_constraint_free(c);
        assert_eq!(rmae_constraint_length(ptr::null()), 0);
        rmae_constraint_free(ptr::null_mut());
    }
}

#[test]
fn bad_arguments_map_to_codes() {
    let mut c = ptr::null_mut();
    let st = unsafe { rmae_constraint_new(1, 3, [7usize].as_ptr(), 1, false, &mut c) };
    assert_eq!(st, RmaeStatus::InvalidArgument);
    assert!(last_error().contains("invalid variant"));
    assert!(c.is_null());
    let st = unsafe { rmae_constraint_new(1, 3, ptr::null(), 0, false, ptr::null_mut()) };
    assert_eq!(st, RmaeStatus::NullPointer);
    let st = unsafe { rmae_constraint_new(1, 40, ptr::null(), 0, true, &mut c) };
    assert_eq!(st, RmaeStatus::DimensionMismatch);
    let bad = CString::new("n = 3").unwrap();
    let st = unsafe { rmae_constraint_from_toml(bad.as_ptr(), &mut c) };
    assert_eq!(st, RmaeStatus::Parse);
    let name = unsafe { CStr::from_ptr(rmae_status_name(RmaeStatus::ResourceCap)) };
    assert_eq!(name.to_str().unwrap(), "resource cap exceeded");
}

#[test]
fn toml_round_trip() {
    let spec = rmae::codespec::CodeSpec::reed_muller(2, 5).unwrap();
    let text = rmae::codespec::Constraint::build(&spec, &[1]).unwrap().to_toml();
    let text = CString::new(text).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { rmae_constraint_from_toml(text.as_ptr(), &mut c) }, RmaeStatus::Ok);
    assert_eq!(unsafe { rmae_constraint_dimension(c) }, 16);
    unsafe { rmae_constraint_free(c) };
}

#[test]
fn encode_and_decode() {
    let c = constraint(2, 5, &[1, 2], false);
    let info: Vec<u8> = (0..16).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let mut x = vec![0u8; 32];
    unsafe {
        assert_eq!(rmae_encode(c, info.as_ptr(), 16, x.as_mut_ptr(), 32), RmaeStatus::Ok);
        assert_eq!(rmae_encode(c, info.as_ptr(), 16, x.as_mut_ptr(), 31), RmaeStatus::DimensionMismatch);
    }
    // a mildly perturbed BPSK image still decodes
    let y: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &b)| (1.0 - 2.0 * b as f64) * if i % 5 == 0 { 0.3 } else { 1.0 })
        .collect();
    let mut out = vec![0u8; 16];
    unsafe {
        assert_eq!(rmae_scl_decode(c, y.as_ptr(), 32, 0.5, 4, out.as_mut_ptr(), 16), RmaeStatus::Ok);
    }
    assert_eq!(out, info);

    let group = CString::new("blta-pl").unwrap();
    let mut d = ptr::null_mut();
    let mut cw = vec![0u8; 32];
    out.fill(0);
    unsafe {
        assert_eq!(rmae_ae_decoder_new(c, group.as_ptr(), 4, 1, 4, false, &mut d), RmaeStatus::Ok);
        let st = rmae_ae_decode(d, y.as_ptr(), 32, 0.5, out.as_mut_ptr(), 16, cw.as_mut_ptr(), 32);
        assert_eq!(st, RmaeStatus::Ok);
        assert_eq!(rmae_ae_decode(d, y.as_ptr(), 32, 0.0, out.as_mut_ptr(), 16, ptr::null_mut(), 0), RmaeStatus::InvalidArgument);
        rmae_ae_decoder_free(d);
    }
    assert_eq!(out, info);
    assert_eq!(cw, x);
    unsafe { rmae_constraint_free(c) };
}

#[test]
fn unstable_ensemble_rejected_unless_transformed() {
    let c = constraint(3, 7, &[], true);
    let group = CString::new("lta").unwrap();
    let mut d = ptr::null_mut();
    unsafe {
        let st = rmae_ae_decoder_new(c, group.as_ptr(), 16, 3, 2, false, &mut d);
        assert_eq!(st, RmaeStatus::UnstablePermutation);
        let st = rmae_ae_decoder_new(c, group.as_ptr(), 16, 3, 2, true, &mut d);
        assert_eq!(st, RmaeStatus::Ok);
        rmae_ae_decoder_free(d);
        rmae_constraint_free(c);
    }
}

#[test]
fn stability_verdicts() {
    let c = constraint(1, 3, &[1], false);
    let mut stable = false;
    // swap of the two lower coordinates keeps the constraint
    let a1 = [0u8, 1, 0, 1, 0, 0, 0, 0, 1];
    // so does z_2 += z_0 with offset 111
    let a2 = [1u8, 0, 0, 0, 1, 0, 1, 0, 1];
    // exchanging the top coordinate with a lower one breaks it
    let a3 = [0u8, 0, 1, 0, 1, 0, 1, 0, 0];
    unsafe {
        assert_eq!(rmae_is_stable(c, a1.as_ptr(), [0u8; 3].as_ptr(), 3, &mut stable), RmaeStatus::Ok);
        assert!(stable);
        assert_eq!(rmae_is_stable(c, a2.as_ptr(), [1u8; 3].as_ptr(), 3, &mut stable), RmaeStatus::Ok);
        assert!(stable);
        assert_eq!(rmae_is_stable(c, a3.as_ptr(), [0u8; 3].as_ptr(), 3, &mut stable), RmaeStatus::Ok);
        assert!(!stable);
        let singular = [1u8, 1, 0, 1, 1, 0, 0, 0, 1];
        assert_eq!(
            rmae_is_stable(c, singular.as_ptr(), [0u8; 3].as_ptr(), 3, &mut stable),
            RmaeStatus::InvalidArgument
        );
        rmae_constraint_free(c);
    }
}

#[test]
fn memory_and_bound() {
    let mut bits = 0u64;
    unsafe {
        assert_eq!(rmae_memory_requirements(3, 8, 8, RmaeMemoryScenario::Stable, &mut bits), RmaeStatus::Ok);
        assert_eq!(bits, 29);
        assert_eq!(rmae_memory_requirements(4, 8, 8, RmaeMemoryScenario::UnknownPerms, &mut bits), RmaeStatus::Ok);
        assert_eq!(bits, 190464);
    }
    let w = [16usize, 18, 20];
    let a = [28632u64, 13504, 172800];
    let mut bound = 0.0;
    unsafe {
        assert_eq!(rmae_union_bound(w.as_ptr(), a.as_ptr(), 3, 0.5, 4.0, 20, &mut bound), RmaeStatus::Ok);
    }
    let expected = rmae::analysis::truncated_union_bound(
        &rmae::analysis::WeightSpectrum::from_counts(w.iter().copied().zip(a)),
        0.5,
        4.0,
        20,
    )
    .unwrap();
    assert_eq!(bound, expected);
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("rmae.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["rmae_constraint_new", "rmae_ae_decode", "rmae_union_bound", "RMAE_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-"])
        .arg("-I")
        .arg(dir.join("include"))
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child
                .stdin
                .take()
                .unwrap()
                .write_all(b"#include \"rmae.h\"\nint main(void) { RmaeConstraint *c = 0; return (int)rmae_constraint_length(c); }\n")?;
            child.wait_with_output()
        })
    else {
        eprintln!("no C compiler found, header syntax not checked");
        return;
    };
    assert!(out.status.success());
}

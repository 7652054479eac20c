use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use soficonv_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    soficonv_string_free(s);
    out
}

unsafe fn last_code() -> String {
    CStr::from_ptr(soficonv_last_error_code())
        .to_str()
        .unwrap()
        .to_owned()
}

fn golden() -> *mut SoficonvPisotBase {
    let lo = CString::new("1.5").unwrap();
    let hi = CString::new("1.7").unwrap();
    let mut base = ptr::null_mut();
    let status = unsafe {
        soficonv_pisot_base_new(
            [-1i64, -1, 1].as_ptr(),
            3,
            lo.as_ptr(),
            hi.as_ptr(),
            2,
            10_000,
            &mut base,
        )
    };
    assert_eq!(status, SoficonvStatus::Ok);
    base
}

#[test]
fn scalars() {
    assert_eq!(soficonv_stern(8191), 1);
    assert_eq!(soficonv_stern(6), 3);
    let mut a = 0.0;
    assert_eq!(unsafe { soficonv_alpha0(14, &mut a) }, SoficonvStatus::Ok);
    assert!((a - 0.56).abs() <= 0.01);
    assert_eq!(
        unsafe { soficonv_alpha0(2, &mut a) },
        SoficonvStatus::DomainError
    );
    let version = unsafe { CStr::from_ptr(soficonv_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn bernoulli_count() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            soficonv_bernoulli_count(2, 3, 6, &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), "3");
        assert_eq!(
            soficonv_bernoulli_count(2, 3, 1 << 40, &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), "41");
        assert_eq!(
            soficonv_bernoulli_count(2, 1, 6, &mut s),
            SoficonvStatus::DomainError
        );
        assert!(!soficonv_last_error_message().is_null());
    }
}

#[test]
fn pisot_handles() {
    let base = golden();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            soficonv_pisot_quasi_expansion(base, &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), r#"{"digits":"10","T":2}"#);
        let open = CString::new("open").unwrap();
        assert_eq!(
            soficonv_pisot_carry_states(base, open.as_ptr(), &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), r#"[["0","0"],["1","0"],["-1","1"]]"#);
        let bad = CString::new("closed").unwrap();
        assert_eq!(
            soficonv_pisot_carry_states(base, bad.as_ptr(), &mut s),
            SoficonvStatus::InvalidInput
        );
        let word = [1usize, 0, 0];
        assert_eq!(
            soficonv_pisot_count_redundant(base, word.as_ptr(), 3, &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), "2");
        let word = [2usize];
        assert_eq!(
            soficonv_pisot_count_redundant(base, word.as_ptr(), 1, &mut s),
            SoficonvStatus::DomainError
        );
        assert_eq!(last_code(), "LETTER_OUT_OF_RANGE");
        soficonv_pisot_base_free(base);
    }
}

#[test]
fn error_paths() {
    let lo = CString::new("2.5").unwrap();
    let hi = CString::new("2.7").unwrap();
    let mut base = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            soficonv_pisot_base_new(
                [1i64, -3, 1].as_ptr(),
                3,
                lo.as_ptr(),
                hi.as_ptr(),
                3,
                2,
                &mut base
            ),
            SoficonvStatus::Ok
        );
        assert_eq!(
            soficonv_pisot_quasi_expansion(base, &mut s),
            SoficonvStatus::DomainError
        );
        assert_eq!(last_code(), "NOT_FINITE_RENYI");
        let open = CString::new("open").unwrap();
        assert_eq!(
            soficonv_pisot_carry_states(base, open.as_ptr(), &mut s),
            SoficonvStatus::CapExceeded
        );
        assert_eq!(last_code(), "STATE_CAP_EXCEEDED");
        soficonv_pisot_base_free(base);

        assert_eq!(
            soficonv_pisot_quasi_expansion(ptr::null(), &mut s),
            SoficonvStatus::NullPointer
        );
        assert_eq!(
            soficonv_bernoulli_count(2, 3, 6, ptr::null_mut()),
            SoficonvStatus::NullPointer
        );
        let bytes = [0xffu8, 0];
        assert_eq!(
            soficonv_linrep_from_json(bytes.as_ptr().cast(), &mut ptr::null_mut()),
            SoficonvStatus::InvalidUtf8
        );
        assert_eq!(soficonv_stern(1), 1);
        soficonv_string_free(ptr::null_mut());
        soficonv_pisot_base_free(ptr::null_mut());
    }
}

#[test]
fn linear_representation_handle() {
    let json =
        CString::new(r#"{"R":[["1/3"],["2/3"]],"M":[[["1/3"]],[["2/3"]]],"C":["1"]}"#).unwrap();
    let mut rep = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            soficonv_linrep_from_json(json.as_ptr(), &mut rep),
            SoficonvStatus::Ok
        );
        let word = [1usize, 0];
        assert_eq!(
            soficonv_linrep_cylinder(rep, word.as_ptr(), 2, &mut s),
            SoficonvStatus::Ok
        );
        assert_eq!(take(s), "2/9");
        assert_eq!(
            soficonv_linrep_cylinder(rep, ptr::null(), 0, &mut s),
            SoficonvStatus::DomainError
        );
        soficonv_linrep_free(rep);

        let unnormalized =
            CString::new(r#"{"R":[["1/3"],["1/3"]],"M":[[["1/3"]],[["2/3"]]],"C":["1"]}"#).unwrap();
        assert_eq!(
            soficonv_linrep_from_json(unnormalized.as_ptr(), &mut rep),
            SoficonvStatus::DomainError
        );
        let garbage = CString::new("{").unwrap();
        assert_eq!(
            soficonv_linrep_from_json(garbage.as_ptr(), &mut rep),
            SoficonvStatus::InvalidInput
        );
    }
}

/// Compiles `tests/smoke.c` against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsoficonv_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("soficonv_smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "0 failures\n");
}

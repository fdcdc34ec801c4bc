use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use splatprior_ffi::*;

fn last_error() -> String {
    let p = sp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn cloud(xyz: &[f64], rgb: Option<&[u8]>) -> *mut SpPointCloud {
    let mut out = ptr::null_mut();
    let rgb = rgb.map_or(ptr::null(), |c| c.as_ptr());
    assert_eq!(sp_cloud_new(xyz.as_ptr(), rgb, xyz.len() / 3, &mut out), SpStatus::Ok);
    out
}

#[test]
fn cloud_round_trip_through_ply() {
    let dir = tempfile::tempdir().unwrap();
    let xyz = [0.0, 1.0, 2.0, -1.5, 0.25, 8.0];
    let rgb = [1, 2, 3, 250, 251, 252];
    let c = cloud(&xyz, Some(&rgb));
    let path = CString::new(dir.path().join("c.ply").to_str().unwrap()).unwrap();
    assert_eq!(sp_cloud_write_ply(c, path.as_ptr(), 0), SpStatus::Ok);
    assert!(sp_last_error_message().is_null());
    let mut back = ptr::null_mut();
    assert_eq!(sp_cloud_read_ply(path.as_ptr(), &mut back), SpStatus::Ok);
    assert_eq!(sp_cloud_len(back), 2);
    let mut pos = [0.0; 6];
    let mut col = [0u8; 6];
    assert_eq!(sp_cloud_positions(back, pos.as_mut_ptr(), 6), SpStatus::Ok);
    assert_eq!(sp_cloud_colors(back, col.as_mut_ptr(), 6), SpStatus::Ok);
    assert_eq!(pos, xyz);
    assert_eq!(col, rgb);
    assert_eq!(sp_cloud_positions(back, pos.as_mut_ptr(), 5), SpStatus::BufferTooSmall);
    unsafe {
        sp_cloud_free(c);
        sp_cloud_free(back);
    }
}

#[test]
fn null_and_bad_arguments_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(sp_cloud_read_ply(ptr::null(), &mut out), SpStatus::NullPointer);
    assert!(last_error().contains("null"));
    let missing = CString::new("/definitely/not/here.ply").unwrap();
    assert_eq!(sp_cloud_read_ply(missing.as_ptr(), &mut out), SpStatus::Io);
    assert!(out.is_null());
    assert_eq!(sp_cloud_len(ptr::null()), 0);
    unsafe { sp_cloud_free(ptr::null_mut()) };

    let c = cloud(&[0.0; 3], None);
    let mut down = ptr::null_mut();
    assert_eq!(sp_cloud_voxel_downsample(c, -1.0, &mut down), SpStatus::InvalidArgument);
    let bad = SpSim3 {
        scale: 1.0,
        rotation: [2.0, 0.0, 0.0, 0.0],
        translation: [0.0; 3],
    };
    assert_eq!(sp_cloud_transform(c, bad, &mut down), SpStatus::InvalidArgument);
    let mut l1 = 0.0;
    assert_eq!(sp_cloud_color_l1(c, c, &mut l1), SpStatus::ColorlessInput);
    unsafe { sp_cloud_free(c) };
}

#[test]
fn errors_are_thread_local() {
    let mut out = ptr::null_mut();
    assert_eq!(sp_cloud_read_ply(ptr::null(), &mut out), SpStatus::NullPointer);
    std::thread::spawn(|| assert!(sp_last_error_message().is_null()))
        .join()
        .unwrap();
    assert!(!sp_last_error_message().is_null());
}

#[test]
fn umeyama_and_apply() {
    let src = [
        0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0,
    ];
    // 90 degrees about z, scale 3, then shift.
    let dst: Vec<f64> = src
        .chunks(3)
        .flat_map(|p| [-3.0 * p[1] + 1.0, 3.0 * p[0] + 2.0, 3.0 * p[2] - 1.0])
        .collect();
    let mut t = SpSim3 {
        scale: 0.0,
        rotation: [0.0; 4],
        translation: [0.0; 3],
    };
    assert_eq!(sp_umeyama(src.as_ptr(), dst.as_ptr(), 5, 1, &mut t), SpStatus::Ok);
    assert!((t.scale - 3.0).abs() < 1e-12);
    let mut p = [0.0; 3];
    assert_eq!(sp_sim3_apply(t, [1.0, 1.0, 1.0].as_ptr(), p.as_mut_ptr()), SpStatus::Ok);
    for (a, b) in p.iter().zip(&dst[12..15]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(
        sp_umeyama(src.as_ptr(), dst.as_ptr(), 2, 1, &mut t),
        SpStatus::Registration
    );
}

#[test]
fn kdtree_matches_brute_force() {
    let xyz: Vec<f64> = (0..300).map(|i| ((i * 7919) % 1000) as f64 / 100.0).collect();
    let c = cloud(&xyz, None);
    let mut tree = ptr::null_mut();
    assert_eq!(sp_kdtree_new(c, &mut tree), SpStatus::Ok);
    let queries: Vec<f64> = (0..60).map(|i| ((i * 104729) % 997) as f64 / 99.0).collect();
    let mut idx = vec![0usize; 20];
    let mut dist = vec![0.0; 20];
    assert_eq!(
        sp_kdtree_nearest(tree, queries.as_ptr(), 20, idx.as_mut_ptr(), dist.as_mut_ptr()),
        SpStatus::Ok
    );
    for (q, (i, d)) in queries.chunks(3).zip(idx.iter().zip(&dist)) {
        let (bi, bd) = xyz
            .chunks(3)
            .map(|p| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
            .enumerate()
            .fold(
                (usize::MAX, f64::INFINITY),
                |best, (j, d)| if d < best.1 { (j, d) } else { best },
            );
        assert_eq!(*i, bi);
        assert_eq!(*d, bd);
    }
    unsafe {
        sp_kdtree_free(tree);
        sp_cloud_free(c);
    }
}

#[test]
fn register_recovers_similarity() {
    // Sheared, asymmetric grid in the source frame.
    let mut lidar = Vec::new();
    for i in 0..20 {
        for j in 0..15 {
            for k in 0..4 {
                let (x, y, z) = (i as f64 * 0.1, j as f64 * 0.13, k as f64 * 0.07);
                lidar.extend([x + 0.3 * y * y, y + 0.05 * x * z, z + 0.2 * x * y]);
            }
        }
    }
    let t = SpSim3 {
        scale: 4.0,
        rotation: [0.5f64.sqrt(), 0.0, 0.0, 0.5f64.sqrt()],
        translation: [1.0, -2.0, 0.5],
    };
    let mut sfm = Vec::with_capacity(lidar.len());
    for p in lidar.chunks(3) {
        let mut q = [0.0; 3];
        assert_eq!(sp_sim3_apply(t, p.as_ptr(), q.as_mut_ptr()), SpStatus::Ok);
        sfm.extend(q);
    }
    let picks = [0usize, 77, 151, 299, 640, 1000, 1199];
    let src: Vec<f64> = picks.iter().flat_map(|&i| lidar[3 * i..3 * i + 3].to_vec()).collect();
    let dst: Vec<f64> = picks.iter().flat_map(|&i| sfm[3 * i..3 * i + 3].to_vec()).collect();
    let a = cloud(&lidar, None);
    let b = cloud(&sfm, None);
    let params = sp_register_params_default();
    let mut out = SpSim3 {
        scale: 0.0,
        rotation: [0.0; 4],
        translation: [0.0; 3],
    };
    let mut report = SpRegisterReport::default();
    let status = sp_register(
        a,
        b,
        ptr::null(),
        src.as_ptr(),
        dst.as_ptr(),
        picks.len(),
        &params,
        &mut out,
        &mut report,
    );
    assert_eq!(status, SpStatus::Ok, "{}", last_error());
    assert_eq!(report.converged, 1);
    assert!((out.scale - 4.0).abs() < 1e-9);
    for (x, y) in out.translation.iter().zip(t.translation) {
        assert!((x - y).abs() < 1e-8);
    }
    unsafe {
        sp_cloud_free(a);
        sp_cloud_free(b);
    }
}

#[test]
fn render_single_splat_center() {
    let dir = tempfile::tempdir().unwrap();
    let body = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n\
                property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\nproperty float opacity\n\
                property float scale_0\nproperty float scale_1\nproperty float scale_2\nproperty float rot_0\n\
                property float rot_1\nproperty float rot_2\nproperty float rot_3\nend_header\n\
                0 0 5 1.7724539 1.7724539 1.7724539 20 -1 -1 -1 1 0 0 0\n";
    let path = dir.path().join("s.ply");
    std::fs::write(&path, body).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut splats = ptr::null_mut();
    assert_eq!(
        sp_splats_read_ply(cpath.as_ptr(), &mut splats),
        SpStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(sp_splats_len(splats), 1);
    let cam = SpCamera {
        fx: 50.0,
        fy: 50.0,
        cx: 16.0,
        cy: 16.0,
        width: 32,
        height: 32,
        rotation: [1.0, 0.0, 0.0, 0.0],
        translation: [0.0; 3],
    };
    let mut rgb = vec![0f32; 3 * 32 * 32];
    let bg = [0.0, 0.0, 0.0];
    assert_eq!(
        sp_render(splats, &cam, bg.as_ptr(), rgb.as_mut_ptr(), rgb.len()),
        SpStatus::Ok,
        "{}",
        last_error()
    );
    // A DC term of 0.5 / C0 gives color 1; sigmoid(20) is nearly opaque.
    let center = &rgb[3 * (16 * 32 + 16)..3 * (16 * 32 + 16) + 3];
    assert!(center.iter().all(|&c| c > 0.9 && c <= 1.0), "{center:?}");
    assert_eq!(rgb[0], 0.0);
    assert_eq!(
        sp_render(splats, &cam, bg.as_ptr(), rgb.as_mut_ptr(), 10),
        SpStatus::BufferTooSmall
    );
    unsafe { sp_splats_free(splats) };
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = header_dir().join("splatprior.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "sp_register",
        "sp_render",
        "SP_STATUS_PANIC",
        "typedef struct SpPointCloud SpPointCloud",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .expect("a C compiler is installed");
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libsplatprior_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new("cc")
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg("-I")
        .arg(header_dir())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}

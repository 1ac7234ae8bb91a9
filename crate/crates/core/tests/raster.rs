use proptest::prelude::*;
use urbanblock_core::raster::{downsample, downsample_area, Raster, Rgb};

/// Each output pixel as the overlap-weighted mean of the source pixels
/// under it, computed directly in two dimensions.
fn oracle(src: &Raster, ow: u32, oh: u32) -> Vec<[f64; 3]> {
    let sx = src.width() as f64 / ow as f64;
    let sy = src.height() as f64 / oh as f64;
    let mut out = Vec::with_capacity((ow * oh) as usize);
    for oy in 0..oh {
        let (y0, y1) = (oy as f64 * sy, (oy + 1) as f64 * sy);
        for ox in 0..ow {
            let (x0, x1) = (ox as f64 * sx, (ox + 1) as f64 * sx);
            let mut acc = [0.0; 3];
            for y in (y0.floor() as u32)..(y1.ceil() as u32).min(src.height()) {
                let wy = (y1.min(y as f64 + 1.0) - y0.max(y as f64)).max(0.0);
                for x in (x0.floor() as u32)..(x1.ceil() as u32).min(src.width()) {
                    let wx = (x1.min(x as f64 + 1.0) - x0.max(x as f64)).max(0.0);
                    let c = src.get(x, y).0;
                    for k in 0..3 {
                        acc[k] += wx * wy * c[k] as f64;
                    }
                }
            }
            out.push(acc.map(|v| v / (sx * sy)));
        }
    }
    out
}

fn max_dev(got: &Raster, want: &[[f64; 3]]) -> f64 {
    got.pixels()
        .zip(want)
        .flat_map(|(g, w)| (0..3).map(move |k| (g.0[k] as f64 - w[k]).abs()))
        .fold(0.0, f64::max)
}

fn checker(n: u32, cell: u32) -> Raster {
    let mut r = Raster::new(n, n, Rgb::BLACK);
    for y in 0..n {
        for x in 0..n {
            if (x / cell + y / cell) % 2 == 0 {
                r.set(x, y, Rgb::WHITE);
            }
        }
    }
    r
}

#[test]
fn checkerboards_match_oracle() {
    for cell in [1, 3, 7, 64] {
        let src = checker(2100, cell);
        let got = downsample(&src).unwrap();
        assert!(max_dev(&got, &oracle(&src, 256, 256)) <= 1.0, "cell {cell}");
    }
}

#[test]
fn half_planes_match_oracle() {
    for split in [1050, 1000, 1337] {
        let mut src = Raster::new(2100, 2100, Rgb::BLACK);
        for y in 0..2100 {
            for x in split..2100 {
                src.set(x, y, Rgb([200, 100, 50]));
            }
        }
        let got = downsample(&src).unwrap();
        assert!(max_dev(&got, &oracle(&src, 256, 256)) <= 1.0, "split {split}");
    }
}

#[test]
fn midline_split_lands_on_pixel_boundary() {
    let mut src = Raster::new(2100, 2100, Rgb::BLACK);
    for y in 0..2100 {
        for x in 1050..2100 {
            src.set(x, y, Rgb::WHITE);
        }
    }
    let got = downsample(&src).unwrap();
    assert_eq!(got.get(127, 10), Rgb::BLACK);
    assert_eq!(got.get(128, 10), Rgb::WHITE);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_images_match_oracle(
        (w, h, data) in (8u32..60, 8u32..60).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), proptest::collection::vec(any::<u8>(), (w * h * 3) as usize))
        }),
        ow in 1u32..8,
        oh in 1u32..8,
    ) {
        let src = Raster::from_raw(w, h, data).unwrap();
        let got = downsample_area(&src, ow, oh);
        prop_assert!(max_dev(&got, &oracle(&src, ow, oh)) <= 0.5 + 1e-9);
    }

    #[test]
    fn constant_images_stay_constant(v in any::<[u8; 3]>(), w in 9u32..80, ow in 1u32..9) {
        let src = Raster::new(w, w, Rgb(v));
        let got = downsample_area(&src, ow, ow);
        prop_assert!(got.pixels().all(|p| p == Rgb(v)));
    }
}

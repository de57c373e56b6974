//! Image similarity scoring and pairwise classification via the
//! inaccuracy ratio of grey-level distributions.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::SeededStream;
use crate::empirical::{estimate_inaccuracy_ratio, EmpiricalSample, EstimateError};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("cannot read image data: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad image format: {0}")]
    Format(String),
}

/// A labeled grayscale image with grey levels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSample {
    pub label: String,
    pub pixels: Vec<f64>,
    pub width: usize,
    pub height: usize,
}

impl ImageSample {
    pub fn new(
        label: impl Into<String>,
        pixels: Vec<f64>,
        width: usize,
        height: usize,
    ) -> Result<Self, ImageError> {
        if pixels.len() != width * height {
            return Err(ImageError::Format(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ImageError::Format("pixel outside [0, 1]".into()));
        }
        Ok(ImageSample {
            label: label.into(),
            pixels,
            width,
            height,
        })
    }

    pub fn zero_pixel_fraction(&self) -> f64 {
        self.pixels.iter().filter(|&&p| p == 0.0).count() as f64 / self.pixels.len() as f64
    }
}

/// Sorted pixel values as an empirical sample; zeros are retained.
pub fn image_to_sample(img: &ImageSample) -> Result<EmpiricalSample, ImageError> {
    Ok(EmpiricalSample::new(img.pixels.clone())?)
}

/// Inaccuracy ratio of `candidate`'s pixel distribution against
/// `anchor`'s; exactly 1 for identical images.
pub fn ratio_score(anchor: &ImageSample, candidate: &ImageSample) -> Result<f64, ImageError> {
    let a = image_to_sample(anchor)?;
    let c = image_to_sample(candidate)?;
    Ok(estimate_inaccuracy_ratio(&a, &c)?)
}

/// Ranking rule: labels ordered by expected inaccuracy ratio against the
/// anchor class, ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationRule {
    pub anchor_label: String,
    pub ordering: Vec<String>,
}

/// Assign a pair of images to the two labels of `rule.ordering`: the
/// image with the smaller ratio score gets the earlier label. Exact ties
/// go to the first argument.
pub fn classify_pair(
    anchor: &ImageSample,
    a: &ImageSample,
    b: &ImageSample,
    rule: &ClassificationRule,
) -> Result<[(String, String); 2], ImageError> {
    if rule.ordering.len() != 2 {
        return Err(ImageError::InsufficientData(
            "classification rule needs exactly two labels".into(),
        ));
    }
    let score_a = ratio_score(anchor, a)?;
    let score_b = ratio_score(anchor, b)?;
    let (first, second) = (&rule.ordering[0], &rule.ordering[1]);
    Ok(if score_a <= score_b {
        [
            (a.label.clone(), first.clone()),
            (b.label.clone(), second.clone()),
        ]
    } else {
        [
            (a.label.clone(), second.clone()),
            (b.label.clone(), first.clone()),
        ]
    })
}

/// Outcome of the train/test pairwise classification protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub anchor_label: String,
    pub anchor_count: usize,
    pub pair: (String, String),
    /// Labels ranked by mean training score, ascending.
    pub ordering: Vec<String>,
    pub mean_train_scores: Vec<(String, f64)>,
    /// P(score(first) < score(second)) over all training cross pairs.
    pub event_probability: f64,
    pub pairs_classified: usize,
    pub truly_classified: Vec<(String, usize)>,
    pub accuracy: f64,
    pub ties: usize,
    pub mean_zero_pixel_fraction: f64,
    pub seed: u64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean ratio score of `img` against the whole anchor set.
fn anchor_set_score(
    anchors: &[EmpiricalSample],
    img: &EmpiricalSample,
) -> Result<f64, ImageError> {
    let mut acc = 0.0;
    for a in anchors {
        acc += estimate_inaccuracy_ratio(a, img)?;
    }
    Ok(acc / anchors.len() as f64)
}

/// Run the full protocol: estimate the ordering and event frequency on
/// the training set, then classify equal-sized pairs from the test set.
pub fn evaluate_protocol(
    train: &[ImageSample],
    test: &[ImageSample],
    anchor_label: &str,
    pair: (&str, &str),
    seed: u64,
) -> Result<ProtocolReport, ImageError> {
    let anchors: Vec<EmpiricalSample> = train
        .iter()
        .filter(|img| img.label == anchor_label)
        .map(image_to_sample)
        .collect::<Result<_, _>>()?;
    if anchors.is_empty() {
        return Err(ImageError::InsufficientData(format!(
            "no training images with anchor label `{anchor_label}`"
        )));
    }

    let scores_for = |set: &[ImageSample], label: &str| -> Result<Vec<f64>, ImageError> {
        set.iter()
            .filter(|img| img.label == label)
            .map(|img| anchor_set_score(&anchors, &image_to_sample(img)?))
            .collect()
    };

    let (label_a, label_b) = (pair.0.to_string(), pair.1.to_string());
    let train_a = scores_for(train, &label_a)?;
    let train_b = scores_for(train, &label_b)?;
    if train_a.is_empty() || train_b.is_empty() {
        return Err(ImageError::InsufficientData(
            "both pair labels need training images".into(),
        ));
    }

    let (mean_a, mean_b) = (mean(&train_a), mean(&train_b));
    let ordering = if mean_a <= mean_b {
        vec![label_a.clone(), label_b.clone()]
    } else {
        vec![label_b.clone(), label_a.clone()]
    };
    // Training event frequency over the full cross product, for the
    // ordering's first label against its second.
    let (first_scores, second_scores) = if ordering[0] == label_a {
        (&train_a, &train_b)
    } else {
        (&train_b, &train_a)
    };
    let mut below = 0usize;
    for &fa in first_scores {
        for &sb in second_scores {
            if fa < sb {
                below += 1;
            }
        }
    }
    let event_probability = below as f64 / (first_scores.len() * second_scores.len()) as f64;

    // Test phase: seeded shuffle, then pair the i-th image of each class.
    let mut test_a: Vec<&ImageSample> = test.iter().filter(|i| i.label == label_a).collect();
    let mut test_b: Vec<&ImageSample> = test.iter().filter(|i| i.label == label_b).collect();
    if test_a.is_empty() || test_b.is_empty() {
        return Err(ImageError::InsufficientData(
            "both pair labels need test images".into(),
        ));
    }
    let mut rng = SeededStream::new(seed, 0).rng();
    test_a.shuffle(&mut rng);
    test_b.shuffle(&mut rng);
    let pairs = test_a.len().min(test_b.len());

    let mut correct_a = 0usize;
    let mut correct_b = 0usize;
    let mut ties = 0usize;
    let mut zero_frac_acc = 0.0;
    for i in 0..pairs {
        let (img_a, img_b) = (test_a[i], test_b[i]);
        zero_frac_acc += img_a.zero_pixel_fraction() + img_b.zero_pixel_fraction();
        let score_a = anchor_set_score(&anchors, &image_to_sample(img_a)?)?;
        let score_b = anchor_set_score(&anchors, &image_to_sample(img_b)?)?;
        if score_a == score_b {
            ties += 1;
        }
        // First argument wins ties.
        let (to_first, to_second) = if score_a <= score_b {
            (img_a, img_b)
        } else {
            (img_b, img_a)
        };
        if to_first.label == ordering[0] {
            if to_first.label == label_a {
                correct_a += 1;
            } else {
                correct_b += 1;
            }
        }
        if to_second.label == ordering[1] {
            if to_second.label == label_a {
                correct_a += 1;
            } else {
                correct_b += 1;
            }
        }
    }
    let accuracy = (correct_a + correct_b) as f64 / (2 * pairs) as f64;

    Ok(ProtocolReport {
        anchor_label: anchor_label.to_string(),
        anchor_count: anchors.len(),
        pair: (label_a.clone(), label_b.clone()),
        ordering,
        mean_train_scores: vec![(label_a.clone(), mean_a), (label_b.clone(), mean_b)],
        event_probability,
        pairs_classified: pairs,
        truly_classified: vec![(label_a, correct_a), (label_b, correct_b)],
        accuracy,
        ties,
        mean_zero_pixel_fraction: zero_frac_acc / (2 * pairs) as f64,
        seed,
    })
}

/// Read labeled images from CSV rows `label, p1, ..., pWH`. An optional
/// header row is skipped. Pixel values above 1 are taken as byte levels
/// and scaled by 1/255.
pub fn read_images_csv(path: &Path, width: usize, height: usize) -> Result<Vec<ImageSample>, ImageError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| ImageError::Format(e.to_string()))?;
    let mut images = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ImageError::Format(e.to_string()))?;
        if record.len() != width * height + 1 {
            return Err(ImageError::Format(format!(
                "row {} has {} fields, expected {}",
                idx + 1,
                record.len(),
                width * height + 1
            )));
        }
        let label = record.get(0).unwrap().trim().to_string();
        let mut pixels = Vec::with_capacity(width * height);
        let mut ok = true;
        for field in record.iter().skip(1) {
            match field.trim().parse::<f64>() {
                Ok(v) => pixels.push(v),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            if idx == 0 {
                continue; // header row
            }
            return Err(ImageError::Format(format!("row {} is not numeric", idx + 1)));
        }
        let max = pixels.iter().cloned().fold(0.0f64, f64::max);
        if max > 1.0 {
            for p in &mut pixels {
                *p /= 255.0;
            }
        }
        images.push(ImageSample::new(label, pixels, width, height)?);
    }
    if images.is_empty() {
        return Err(ImageError::InsufficientData("no image rows".into()));
    }
    Ok(images)
}

/// Read a PGM (P2 ascii or P5 binary) image; pixels are scaled by the
/// declared maximum grey value.
pub fn read_pgm(path: &Path, label: &str) -> Result<ImageSample, ImageError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |m: &str| ImageError::Format(format!("{}: {m}", path.display()));

    // Header tokens: magic, width, height, maxval; comments start with '#'.
    let mut pos = 0usize;
    let mut tokens: Vec<String> = Vec::new();
    while tokens.len() < 4 && pos < bytes.len() {
        let c = bytes[pos];
        if c == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else if c.is_ascii_whitespace() {
            pos += 1;
        } else {
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
    }
    if tokens.len() < 4 {
        return Err(bad("truncated header"));
    }
    let magic = tokens[0].clone();
    let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let maxval: f64 = tokens[3].parse().map_err(|_| bad("bad maxval"))?;
    if maxval <= 0.0 {
        return Err(bad("maxval must be positive"));
    }

    let pixels: Vec<f64> = match magic.as_str() {
        "P2" => String::from_utf8_lossy(&bytes[pos..])
            .split_ascii_whitespace()
            .map(|t| t.parse::<f64>().map(|v| v / maxval))
            .collect::<Result<_, _>>()
            .map_err(|_| bad("bad ascii pixel"))?,
        "P5" => {
            pos += 1; // single whitespace after maxval
            bytes[pos..].iter().map(|&b| b as f64 / maxval).collect()
        }
        _ => return Err(bad("unsupported magic (want P2 or P5)")),
    };
    if pixels.len() < width * height {
        return Err(bad("pixel data shorter than declared size"));
    }
    ImageSample::new(label, pixels[..width * height].to_vec(), width, height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(label: &str, pixels: Vec<f64>) -> ImageSample {
        let n = pixels.len();
        ImageSample::new(label, pixels, n, 1).unwrap()
    }

    #[test]
    fn image_to_sample_sorts_and_keeps_zeros() {
        let i = img("x", vec![1.0, 0.0, 0.5, 0.5]);
        let s = image_to_sample(&i).unwrap();
        assert_eq!(s.values(), &[0.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn self_ratio_is_one() {
        let i = img("x", vec![0.1, 0.7, 0.3, 0.9, 0.2]);
        assert_eq!(ratio_score(&i, &i).unwrap(), 1.0);
    }

    #[test]
    fn ratio_ignores_pixel_order() {
        let a = img("a", vec![0.1, 0.7, 0.3, 0.9]);
        let b = img("b", vec![0.9, 0.3, 0.7, 0.1]);
        let probe = img("p", vec![0.2, 0.4, 0.6, 0.8]);
        assert_eq!(ratio_score(&a, &probe).unwrap(), ratio_score(&b, &probe).unwrap());
    }

    #[test]
    fn degenerate_anchor_fails() {
        let flat = img("flat", vec![0.5, 0.5, 0.5]);
        let other = img("o", vec![0.1, 0.2, 0.9]);
        assert!(ratio_score(&flat, &other).is_err());
    }

    #[test]
    fn classify_pair_antisymmetric() {
        let anchor = img("0", vec![0.05, 0.2, 0.4, 0.6, 0.8]);
        let low = img("1", vec![0.0, 0.1, 0.2, 0.3, 0.4]);
        let high = img("2", vec![0.5, 0.6, 0.7, 0.8, 0.9]);
        let rule = ClassificationRule {
            anchor_label: "0".into(),
            ordering: vec!["1".into(), "2".into()],
        };
        let fwd = classify_pair(&anchor, &low, &high, &rule).unwrap();
        let rev = classify_pair(&anchor, &high, &low, &rule).unwrap();
        assert_eq!(fwd[0].0, rev[1].0);
        assert_eq!(fwd[0].1, rev[1].1);
        // Identical images fall to the tie rule deterministically.
        let t1 = classify_pair(&anchor, &low, &low.clone(), &rule).unwrap();
        let t2 = classify_pair(&anchor, &low, &low.clone(), &rule).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1[0].1, "1");
    }

    #[test]
    fn protocol_on_separable_classes() {
        // The anchor class spans [0, 1] so candidate classes concentrated
        // low vs high get strictly ordered scores.
        let mk = |label: &str, base: f64, spread: f64, n: usize| -> Vec<ImageSample> {
            (0..n)
                .map(|j| {
                    let pixels: Vec<f64> = (0..16)
                        .map(|p| base + spread * (p as f64 + 0.5) / 16.0 + 0.001 * (j % 7) as f64)
                        .collect();
                    img(label, pixels)
                })
                .collect()
        };
        let mut train = mk("0", 0.0, 0.99, 8);
        train.extend(mk("1", 0.1, 0.15, 8));
        train.extend(mk("2", 0.6, 0.15, 8));
        let mut test = mk("1", 0.1, 0.15, 6);
        test.extend(mk("2", 0.6, 0.15, 6));
        let report = evaluate_protocol(&train, &test, "0", ("1", "2"), 9).unwrap();
        assert_eq!(report.pairs_classified, 6);
        assert_eq!(report.ties, 0);
        assert!(report.accuracy > 0.99, "accuracy {}", report.accuracy);
        assert!(report.event_probability > 0.99);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p2 = dir.path().join("a.pgm");
        std::fs::write(&p2, "P2\n# comment\n2 2\n255\n0 128\n255 64\n").unwrap();
        let i = read_pgm(&p2, "a").unwrap();
        assert_eq!(i.width, 2);
        assert!((i.pixels[1] - 128.0 / 255.0).abs() < 1e-12);
        let p5 = dir.path().join("b.pgm");
        std::fs::write(&p5, b"P5\n2 2\n255\n\x00\x80\xff\x40".as_slice()).unwrap();
        let j = read_pgm(&p5, "b").unwrap();
        assert_eq!(j.pixels.len(), 4);
        assert!((j.pixels[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.csv");
        std::fs::write(&path, "label,p1,p2,p3,p4\nA,0,128,255,64\nB,0.1,0.2,0.3,0.4\n").unwrap();
        let imgs = read_images_csv(&path, 2, 2).unwrap();
        assert_eq!(imgs.len(), 2);
        assert_eq!(imgs[0].label, "A");
        assert!((imgs[0].pixels[2] - 1.0).abs() < 1e-12);
        assert!((imgs[1].pixels[0] - 0.1).abs() < 1e-12);
    }
}

//! Cuts an annotated recording into labeled 2 s blocks.
//!
//! The recording is stitched from synthetic clips so the example needs no
//! input files; any block touching a no-bee interval is labeled no-bee.

use hive_sound::audio::{parse_annotations, segment};
use hive_sound::eval::gen_synthetic_corpus;
use hive_sound::AudioClip;

fn main() -> hive_sound::Result<()> {
    let clips = gen_synthetic_corpus(3, 2, 4)?;
    // bee, bee, nobee, bee, nobee, then a 0.5 s tail
    let order = [0, 1, 3, 2, 4];
    let mut samples: Vec<f64> = order.iter().flat_map(|&i| clips[i].clip.samples().to_vec()).collect();
    samples.extend_from_slice(&clips[0].clip.samples()[..11025]);
    let recording = AudioClip::new(samples, 22050)?;

    let annotations = parse_annotations("0\t4\tbee\n4\t6\tnobee\n6\t7.9\tbee\n8.1\t10\tnobee\n10\t10.5\tbee\n")?;
    for seg in segment(&recording, &annotations, 2.0, "stitched")? {
        println!("{:>5.1} s  {:<6} {} samples", seg.offset, seg.label, seg.clip.len());
    }
    Ok(())
}

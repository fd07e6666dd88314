//! The five built-in workloads.
//!
//! Resource figures are representative, chosen so every on-board compute
//! step fits an eclipse window under the default envelope (p ≤ 25 W,
//! c ≤ 0.6, θ ≤ 15 W, 30–300 s). Data volumes follow each pattern's
//! published reduction chain.
//!
//! | preset | space → ground payload | ground → space payload |
//! |---|---|---|
//! | ml-inference | 10.5 MB | – |
//! | split-learning | 36.75 MB | 5.25 MB |
//! | eo-qa | 560 MB | – |
//! | federated | 3.7 MB | 5.8 MB |
//! | store-forward | 157.5 MB | – |

use super::{Encryption, Integrity, Location, ProcessingStep, Workload, WorkloadError};

pub const PRESET_NAMES: [&str; 5] = [
    "ml-inference",
    "split-learning",
    "eo-qa",
    "federated",
    "store-forward",
];

pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

/// One-line description of a preset.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "ml-inference" => "on-board image inference, encrypted results downlinked",
        "split-learning" => {
            "feature extraction in orbit, model training on the ground, weights uplinked"
        }
        "eo-qa" => "imagery quality filtering and compression before downlink and ground archiving",
        "federated" => "local training with a sparse gradient downlink and global model uplink",
        "store-forward" => "data received on one contact, protected and forwarded on a later one",
        _ => return None,
    })
}

struct Spec {
    id: &'static str,
    loc: Location,
    power: f64,
    compute: f64,
    thermal: f64,
    memory: f64,
    duration: f64,
    data_in: f64,
    data_out: f64,
}

fn step(s: Spec) -> ProcessingStep {
    ProcessingStep {
        power: s.power,
        compute: s.compute,
        thermal: s.thermal,
        memory: s.memory,
        storage: s.data_out,
        data_in: s.data_in,
        data_out: s.data_out,
        ..ProcessingStep::new(s.id, s.loc, s.duration)
    }
}

macro_rules! spec {
    ($id:expr, $loc:ident, p $p:expr, c $c:expr, th $t:expr, mem $m:expr, d $d:expr, $i:expr => $o:expr) => {
        step(Spec {
            id: $id,
            loc: Location::$loc,
            power: $p,
            compute: $c,
            thermal: $t,
            memory: $m,
            duration: $d,
            data_in: $i,
            data_out: $o,
        })
    };
}

fn encrypted(mut s: ProcessingStep, enc: Encryption, int: Integrity) -> ProcessingStep {
    s.encryption = enc;
    s.integrity = int;
    s
}

fn chain(name: &str, steps: Vec<ProcessingStep>) -> Workload {
    let edges = steps
        .windows(2)
        .map(|w| (w[0].id.clone(), w[1].id.clone()))
        .collect();
    Workload {
        name: name.to_string(),
        steps,
        edges,
        deadline_orbits: 8.0,
    }
}

fn ml_inference() -> Workload {
    let mut encrypt = encrypted(
        spec!("encrypt", Onboard, p 8.0, c 0.2, th 4.0, mem 128.0, d 30.0, 10.0 => 10.5),
        Encryption::Aes256,
        Integrity::Sha256,
    );
    encrypt.deliver_to_ground = true;
    chain(
        "ml-inference",
        vec![
            spec!("capture", Onboard, p 18.0, c 0.2, th 8.0, mem 512.0, d 60.0, 0.0 => 2000.0),
            spec!("preprocess", Either, p 20.0, c 0.5, th 12.0, mem 1024.0, d 120.0, 2000.0 => 500.0),
            spec!("inference", Either, p 22.0, c 0.6, th 14.0, mem 2048.0, d 180.0, 500.0 => 10.0),
            encrypt,
        ],
    )
}

fn split_learning() -> Workload {
    chain(
        "split-learning",
        vec![
            spec!("capture", Onboard, p 18.0, c 0.2, th 8.0, mem 512.0, d 60.0, 0.0 => 2000.0),
            spec!("feature-extract", Either, p 24.0, c 0.6, th 14.0, mem 2048.0, d 240.0, 2000.0 => 50.0),
            spec!("compress-features", Onboard, p 10.0, c 0.3, th 5.0, mem 256.0, d 45.0, 50.0 => 35.0),
            encrypted(
                spec!("encrypt-features", Onboard, p 8.0, c 0.2, th 4.0, mem 128.0, d 30.0, 35.0 => 36.75),
                Encryption::Aes256,
                Integrity::Sha256,
            ),
            spec!("decrypt-features", Ground, p 50.0, c 0.2, th 20.0, mem 512.0, d 20.0, 36.75 => 35.0),
            spec!("backend-train", Either, p 250.0, c 1.0, th 180.0, mem 16384.0, d 600.0, 35.0 => 5.0),
            encrypted(
                spec!("encrypt-weights", Ground, p 50.0, c 0.2, th 20.0, mem 256.0, d 10.0, 5.0 => 5.25),
                Encryption::Aes256,
                Integrity::Sha256,
            ),
            spec!("update-frontend", Onboard, p 12.0, c 0.3, th 6.0, mem 256.0, d 60.0, 5.25 => 0.0),
        ],
    )
}

fn eo_qa() -> Workload {
    let mut encrypt = encrypted(
        spec!("encrypt", Onboard, p 8.0, c 0.2, th 4.0, mem 256.0, d 45.0, 400.0 / 0.75 => 560.0),
        Encryption::Aes256,
        Integrity::None,
    );
    encrypt.channel_ready = true;
    chain(
        "eo-qa",
        vec![
            spec!("capture", Onboard, p 18.0, c 0.2, th 8.0, mem 1024.0, d 90.0, 0.0 => 5000.0),
            spec!("quality-check", Either, p 15.0, c 0.4, th 8.0, mem 1024.0, d 120.0, 5000.0 => 4500.0),
            spec!("cloud-filter", Either, p 20.0, c 0.5, th 10.0, mem 1024.0, d 150.0, 4500.0 => 3000.0),
            spec!("compress", Either, p 22.0, c 0.6, th 12.0, mem 2048.0, d 240.0, 3000.0 => 400.0),
            spec!("fec-encode", Onboard, p 12.0, c 0.3, th 6.0, mem 512.0, d 60.0, 400.0 => 400.0 / 0.75),
            encrypt,
            spec!("ingest", Ground, p 50.0, c 0.2, th 20.0, mem 1024.0, d 30.0, 560.0 => 400.0),
            spec!("orthorectify", Ground, p 150.0, c 0.8, th 100.0, mem 8192.0, d 300.0, 400.0 => 400.0),
            spec!("archive", Ground, p 20.0, c 0.1, th 5.0, mem 256.0, d 10.0, 400.0 => 0.0),
        ],
    )
}

fn federated() -> Workload {
    chain(
        "federated",
        vec![
            spec!("load-local-data", Onboard, p 10.0, c 0.2, th 5.0, mem 1024.0, d 30.0, 0.0 => 800.0),
            spec!("local-train", Onboard, p 24.0, c 0.6, th 15.0, mem 4096.0, d 300.0, 800.0 => 50.0),
            spec!("compute-gradients", Onboard, p 20.0, c 0.5, th 12.0, mem 2048.0, d 120.0, 50.0 => 40.0),
            spec!("sparsify-topk", Onboard, p 15.0, c 0.4, th 8.0, mem 1024.0, d 60.0, 40.0 => 4.0),
            spec!("compress-update", Onboard, p 10.0, c 0.3, th 5.0, mem 256.0, d 30.0, 4.0 => 3.7 / 1.05),
            encrypted(
                spec!("encrypt-update", Onboard, p 8.0, c 0.2, th 4.0, mem 128.0, d 30.0, 3.7 / 1.05 => 3.7),
                Encryption::Aes256,
                Integrity::Sha256,
            ),
            spec!("decrypt-update", Ground, p 50.0, c 0.2, th 20.0, mem 256.0, d 10.0, 3.7 => 3.7 / 1.05),
            spec!("fedavg-aggregate", Ground, p 200.0, c 0.9, th 120.0, mem 8192.0, d 300.0, 3.7 / 1.05 => 5.8 / 1.05),
            encrypted(
                spec!("encrypt-model", Ground, p 50.0, c 0.2, th 20.0, mem 256.0, d 10.0, 5.8 / 1.05 => 5.8),
                Encryption::Aes256,
                Integrity::Sha256,
            ),
            spec!("apply-global-model", Onboard, p 12.0, c 0.3, th 6.0, mem 512.0, d 60.0, 5.8 => 0.0),
        ],
    )
}

fn store_forward() -> Workload {
    let mut receive =
        spec!("receive", Onboard, p 15.0, c 0.2, th 6.0, mem 256.0, d 60.0, 0.0 => 100.0);
    receive.needs_comms = true;
    let mut check =
        spec!("integrity-check", Onboard, p 6.0, c 0.1, th 3.0, mem 128.0, d 30.0, 100.0 => 100.0);
    check.integrity = Integrity::Crc32;
    let mut encrypt = encrypted(
        spec!("encrypt", Onboard, p 8.0, c 0.2, th 4.0, mem 128.0, d 30.0, 150.0 => 157.5),
        Encryption::Aes256,
        Integrity::Crc32,
    );
    encrypt.channel_ready = true;
    chain(
        "store-forward",
        vec![
            receive,
            check,
            // Reed-Solomon at rate 2/3: any two of three blocks reconstruct
            spec!("erasure-encode", Onboard, p 12.0, c 0.3, th 6.0, mem 256.0, d 60.0, 100.0 => 150.0),
            encrypt,
            spec!("ground-decode", Ground, p 50.0, c 0.2, th 20.0, mem 512.0, d 30.0, 157.5 => 100.0),
            spec!("deliver", Ground, p 20.0, c 0.1, th 5.0, mem 128.0, d 10.0, 100.0 => 0.0),
        ],
    )
}

pub fn load_preset(name: &str) -> Result<Workload, WorkloadError> {
    match name {
        "ml-inference" => Ok(ml_inference()),
        "split-learning" => Ok(split_learning()),
        "eo-qa" => Ok(eo_qa()),
        "federated" => Ok(federated()),
        "store-forward" => Ok(store_forward()),
        other => Err(WorkloadError::UnknownPreset(other.to_string())),
    }
}

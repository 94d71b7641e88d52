//! Shared fixtures for the kernel benchmarks.

use occuforge_core::eval::ChargerData;
use occuforge_core::features::{build_dataset, Sample};
use occuforge_core::models::{HybridConfig, HybridModel};
use occuforge_core::synth::{synth_generate, SlotSchedule, SynthSpec};

/// A week-scale scheduled series split 70/30.
pub fn charger_data(days: usize) -> ChargerData {
    let spec = SynthSpec {
        charger_id: "BENCH".to_string(),
        days,
        schedule: Some(SlotSchedule { weekday: vec![(48, 96)], weekend: vec![(24, 60)] }),
        ..SynthSpec::default()
    };
    ChargerData::prepare(synth_generate(&spec).unwrap(), 0.7).unwrap()
}

pub fn default_model(k: usize) -> HybridModel {
    HybridModel::new(HybridConfig::default().with_k(k), 7).unwrap()
}

pub fn training_samples(data: &ChargerData, k: usize) -> Vec<Sample> {
    let train = occuforge_core::ingest::split_train_test(&data.series, 0.7).unwrap().train;
    build_dataset(&train, &data.profiles, 12, k).unwrap().samples
}

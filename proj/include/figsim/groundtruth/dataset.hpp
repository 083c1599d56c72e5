#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "figsim/groundtruth/simulate.hpp"

namespace figsim {

struct DatasetConfig {
  int trajectories = 1000;
  int steps = 100;
  int min_objects = 2;  // dynamic objects, floor excluded
  int max_objects = 4;
  double dt = 1.0 / 120.0;
  double gravity = 9.81;
  int sphere_subdivisions = 1;
  double sphere_probability = 0.6;  // otherwise a box
  double train_fraction = 0.8;
  double valid_fraction = 0.1;  // remainder is the test split
  std::string out_dir;
};

//! Binary trajectory: one-line JSON header (dt, gravity, steps, object specs
//! with meshes) + per step float32 LE pose (w x y z tx ty tz) and vertex
//! arrays per object.
void write_trajectory(const Trajectory& trajectory, const std::string& path);
Trajectory read_trajectory(const std::string& path);

//! Random toss scene: static floor quad plus dynamic spheres/boxes dropped
//! from non-overlapping poses.
SceneSpec random_scene(const DatasetConfig& cfg, uint64_t seed);

struct DatasetManifest {
  double dt = 1.0 / 120.0;
  double gravity = 9.81;
  std::vector<std::string> train;  // file names relative to the manifest
  std::vector<std::string> valid;
  std::vector<std::string> test;
};

//! Simulates cfg.trajectories scenes and writes them plus manifest.json
//! under cfg.out_dir. Deterministic per seed.
DatasetManifest generate_dataset(const DatasetConfig& cfg, uint64_t seed);

DatasetManifest read_dataset_manifest(const std::string& path);

//! Load every trajectory of a split ("train", "valid", "test").
std::vector<Trajectory> load_split(const std::string& manifest_path, const std::string& split);

}  // namespace figsim

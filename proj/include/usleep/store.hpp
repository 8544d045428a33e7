#ifndef USLEEP_STORE_HPP_
#define USLEEP_STORE_HPP_

#include <string>

#include "usleep/preprocess.hpp"

namespace usleep {

// On-disk recording store: one directory per recording holding
//   manifest.json   channel labels/rates/scale provenance + subject meta
//   <channel>.f32   raw little-endian float32 samples, one file per channel
//   labels.txt      one class token per 30 s epoch (W N1 N2 N3 REM MASK)
void write_recording_store(const PreprocessedRecording& rec, const std::string& dir);
PreprocessedRecording read_recording_store(const std::string& dir);

std::string class_token(int class_index);
int parse_class_token(const std::string& token);

}  // namespace usleep

#endif  // USLEEP_STORE_HPP_

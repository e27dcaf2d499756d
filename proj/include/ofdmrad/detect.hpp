#pragma once

#include <vector>

#include "ofdmrad/rxproc.hpp"

namespace ofdmrad {

struct CfarConfig {
    int guard_range = 4;
    int guard_doppler = 4;
    int train_range = 12;
    int train_doppler = 8;
    double pfa = 1e-4;
    int max_detections = 50;

    void validate() const;
};

struct CoarsePeak {
    int range_bin = 0;
    int doppler_bin = 0;
    double power_dbm = 0;
};

namespace detect {

/// 2D cell-averaging CFAR on |I|^2. Border training windows are truncated and
/// the threshold factor is renormalized to the live cell count, keeping the
/// false-alarm rate constant up to the edge. Threshold crossings are clustered
/// (8-connected); each cluster reports its maximum cell. Results are sorted by
/// descending power, ties broken by (range, doppler).
std::vector<CoarsePeak> cfar_detect(const RangeDopplerImage& image, const CfarConfig& cfg);

/// Interior training-cell count of a CFAR footprint.
int interior_training_cells(const CfarConfig& cfg);

/// False-alarm probability whose CA-CFAR threshold factor equals the given
/// dB level for n_train references; lets a detector be pinned to a
/// reliable-detection bound instead of a nominal Pfa.
double pfa_for_threshold_db(double threshold_db, int n_train);

} // namespace detect
} // namespace ofdmrad

#pragma once

#include "sasa/alignment.hpp"
#include "sasa/segments.hpp"
#include "sasa/structure.hpp"
#include "sasa/synth.hpp"
#include "sasa/timeseries.hpp"
#include "sasa/variant.hpp"

#include <string>
#include <vector>

namespace sasa {

// sasa_iv is the full model: straight-through indicator alignment of both
// attention families (source side gradient-stopped) plus the strength
// autoencoder. The -alpha/-beta/-gamma variants drop one loss term, -c swaps
// the one-way alignment for a two-way one. sasa is the distribution-matching
// ancestor (MMD on the raw attention weights, no strength code), with its own
// -alpha/-beta ablations. source_only trains the label path alone and never
// reads target data.
enum class ModelVariant {
    sasa_iv,
    sasa_iv_alpha,
    sasa_iv_beta,
    sasa_iv_gamma,
    sasa_iv_c,
    sasa,
    sasa_alpha,
    sasa_beta,
    source_only,
};

ModelVariant parse_model_variant(const std::string& s);
std::string model_variant_name(ModelVariant v);

bool variant_uses_code(ModelVariant v);      // g_v concatenated into H
bool variant_aligns_alpha(ModelVariant v);
bool variant_aligns_beta(ModelVariant v);
bool variant_reconstructs(ModelVariant v);
AlignMode variant_align_mode(ModelVariant v);

struct ModelConfig {
    ModelVariant variant = ModelVariant::sasa_iv;
    Task task = Task::regression;
    int d_h = 32;
    int d_g = 0; // 0 resolves to M*16 (concat pooling) or 16 (mean)
    int d_e = 16;
    int head_hidden = 64;
    int num_classes = 2;
    double omega = 1.0;
    double gamma = 0.5;
    double mu = 0.08;
    IndicatorEstimator estimator = IndicatorEstimator::straight_through;
    Aggregate aggregate = Aggregate::batch_mean;
    double st_band = 1.0;
    double sigmoid_temperature = 0.1;
    VariantPool pool = VariantPool::concat;
    double lr = 1e-3;
    int batch_size = 64;
    int epochs = 10;
    std::uint64_t seed = 7;

    void validate() const;
};

struct LossBreakdown {
    double l_y = 0.0;
    double l_alpha = 0.0;
    double l_beta = 0.0;
    double l_r = 0.0;
    double total = 0.0;
};

struct FitResult {
    std::vector<LossBreakdown> history; // one averaged record per epoch
    long steps_taken = 0;
    long steps_skipped = 0;
};

struct ForwardResult {
    ad::Var h; // [B x (2*M*d_h + d_g)] when the code is in play
    StructureEstimate est;
    VariantState vst;
    bool has_code = false;
};

struct StructureReport {
    StructureSummary summary;
    BinarizedStructure bin;
};

class SasaModel {
public:
    SasaModel(ModelConfig cfg, int m, int n);

    // with_code=false skips the strength autoencoder; useful when only the
    // attention structures of a pass are consumed.
    ForwardResult forward(ad::Tape& tape, const TimeSeriesBatch& x,
                          std::vector<ad::LeafRecord>* trace = nullptr,
                          bool with_code = true);
    // Raw head output: logits [B x K] for classification, [B x 1] values
    // for regression.
    ad::Var predict(ad::Tape& tape, ad::Var h,
                    std::vector<ad::LeafRecord>* trace = nullptr);
    // Cross-entropy (classification) or root-mean-squared error (regression)
    // against the batch labels.
    ad::Var label_loss(ad::Tape& tape, ad::Var out, const TimeSeriesBatch& x);

    // One optimizer step on the composite objective
    //   total = l_y + omega*(l_alpha + l_beta) + gamma*l_r
    // with terms dropped per the variant. Steps with non-finite gradients
    // are skipped; ten consecutive skips abort.
    LossBreakdown train_step(const TimeSeriesBatch& src,
                             const TimeSeriesBatch& tgt);
    FitResult fit(const TimeSeriesBatch& src, const TimeSeriesBatch& tgt);

    // Inference passes (no gradients). Scores: probabilities [B x K] for
    // classification, values [B x 1] for regression.
    Mat predict_scores(const TimeSeriesBatch& x);
    StructureReport structures(const TimeSeriesBatch& x);

    void save(const std::string& path) const;
    static SasaModel load(const std::string& path);

    std::vector<ad::Parameter*> params();
    AlignmentConfig alignment_config() const;

    ModelConfig cfg;
    int m = 0;
    int n = 0;
    SegmentEncoderParams seg;
    AttentionParams attn;
    VariantParams code; // live only when the variant family uses it
    ad::Parameter head_w1, head_b1, head_w2, head_b2;

private:
    void adam_step_();
    Rng rng_;
    std::vector<Mat> adam_m_, adam_v_;
    long adam_t_ = 0;
    int skip_streak_ = 0;
};

} // namespace sasa

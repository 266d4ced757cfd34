use std::io::{Read, Write};

use super::{ClassWeights, FeatureConfig, LossKind, TaggerModel, TrainHistory};
use crate::codec::{BinReader, BinWriter, CodecError};
use crate::corpus::Label;

const MAGIC: &[u8; 8] = b"SNERMDL\0";
const VERSION: u32 = 1;

/// Header, feature configuration, training metadata, then the nonzero
/// weights as `(index, value)` pairs.
pub fn write_model<W: Write>(w: W, model: &TaggerModel) -> std::io::Result<()> {
    let mut w = BinWriter::new(w);
    w.header(MAGIC, VERSION)?;
    let f = &model.features;
    w.len(f.hash_dim)?;
    w.len(f.ngram_sizes.len())?;
    for &n in &f.ngram_sizes {
        w.len(n)?;
    }
    w.len(f.window)?;
    w.u8(u8::from(f.shape_features))?;
    for c in model.class_weights.0 {
        w.f64(c)?;
    }
    w.u8(match model.loss {
        LossKind::Weighted => 0,
        LossKind::Unweighted => 1,
    })?;
    w.u64(model.seed)?;
    w.str(&model.corpus_name)?;
    let h = &model.history;
    w.len(h.best_epoch)?;
    w.len(h.epoch_loss.len())?;
    for (l, v) in h.epoch_loss.iter().zip(&h.validation_fbeta) {
        w.f64(*l)?;
        w.f64(*v)?;
    }
    w.len(model.nonzero_parameters())?;
    for (i, &v) in model.weights.iter().enumerate() {
        if v != 0.0 {
            w.len(i)?;
            w.f64(v)?;
        }
    }
    Ok(())
}

pub fn read_model<R: Read>(r: R) -> Result<TaggerModel, CodecError> {
    let mut r = BinReader::new(r);
    r.header(MAGIC, VERSION, "model")?;
    let bad = |what: &str| CodecError::InvalidValue(what.to_string());
    let hash_dim = r.len()?;
    let n_sizes = r.len()?;
    let ngram_sizes = (0..n_sizes).map(|_| r.len()).collect::<Result<Vec<_>, _>>()?;
    let window = r.len()?;
    let shape_features = match r.u8()? {
        0 => false,
        1 => true,
        _ => return Err(bad("shape flag")),
    };
    let features = FeatureConfig { hash_dim, ngram_sizes, window, shape_features };
    features.validate().map_err(CodecError::InvalidValue)?;
    let mut cw = [0.0; Label::COUNT];
    for c in cw.iter_mut() {
        *c = r.f64()?;
        if !(c.is_finite() && *c > 0.0) {
            return Err(bad("class weight"));
        }
    }
    let loss = match r.u8()? {
        0 => LossKind::Weighted,
        1 => LossKind::Unweighted,
        _ => return Err(bad("loss kind")),
    };
    let seed = r.u64()?;
    let corpus_name = r.str()?;
    let best_epoch = r.len()?;
    let epochs = r.len()?;
    let mut history = TrainHistory { best_epoch, ..TrainHistory::default() };
    for _ in 0..epochs {
        history.epoch_loss.push(r.f64()?);
        history.validation_fbeta.push(r.f64()?);
    }
    let size = features.rows() * Label::COUNT;
    let mut weights = vec![0.0; size];
    let nonzero = r.len()?;
    for _ in 0..nonzero {
        let i = r.len()?;
        let v = r.f64()?;
        if i >= size || !v.is_finite() {
            return Err(bad("weight entry"));
        }
        weights[i] = v;
    }
    r.finish()?;
    Ok(TaggerModel { features, class_weights: ClassWeights(cw), loss, seed, corpus_name, history, weights })
}

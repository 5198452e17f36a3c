use std::path::Path;

use super::{AcousticError, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

fn wav_error(path: &Path, e: hound::Error) -> AcousticError {
    match e {
        hound::Error::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            AcousticError::Truncated(path.to_path_buf())
        }
        hound::Error::IoError(io) => AcousticError::Io(io),
        hound::Error::Unsupported => AcousticError::UnsupportedEncoding("unsupported WAV format".into()),
        other => AcousticError::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

/// Read a mono PCM16 or float32 WAV, normalized so that PCM16 −32768 maps to −1.0.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform, AcousticError> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(AcousticError::Multichannel(spec.channels));
    }
    let expected = reader.len() as usize;
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        (fmt, bits) => {
            return Err(AcousticError::UnsupportedEncoding(format!("{fmt:?} {bits}-bit")));
        }
    };
    if samples.len() < expected {
        return Err(AcousticError::Truncated(path.to_path_buf()));
    }
    Waveform::new(samples, spec.sample_rate)
}

/// Write a mono WAV; PCM16 output is clipped to [−1, 1).
pub fn write_wav(path: impl AsRef<Path>, w: &Waveform, encoding: WavEncoding) -> Result<(), AcousticError> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: w.sample_rate,
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => hound::SampleFormat::Int,
            WavEncoding::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &s in &w.samples {
        match encoding {
            WavEncoding::Pcm16 => {
                let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                writer.write_sample(v)
            }
            WavEncoding::Float32 => writer.write_sample(s as f32),
        }
        .map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}

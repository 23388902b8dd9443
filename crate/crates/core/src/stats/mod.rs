//! Special functions, image-quality metrics and the paired t-test.

pub mod quality;
pub mod special;
pub mod ttest;

pub use quality::{cosine_similarity, mse, psnr, ssim, QualityError};
pub use special::{normal_cdf, normal_pdf, student_t_cdf, student_t_quantile};
pub use ttest::{paired_t_test, TTestError, TTestReport};

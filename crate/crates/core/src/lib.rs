pub mod beta;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod pam;
pub mod reach;
pub mod seqlab;
pub mod transfer;

package demo;

public class Grades {
    public String showBug(int score) {
        String grade = "F";
        switch (score / 10) {
            case 10:
            case 9:
                grade = "A";
            case 8:
                grade = "B";
                break;
            default:
                grade = "C";
        }
        return grade;
    }
}
